# Qualitative tensor analysis package
