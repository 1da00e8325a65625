# Test fixtures for qmono
