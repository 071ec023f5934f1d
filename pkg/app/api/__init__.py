# HTTP routes: filter design, plane-wave truth, equator factors
