# Test package for the metnet analysis toolkit
