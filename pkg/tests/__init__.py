# Tests package for qmono
