# File formats: WAV + sidecar, filter-bank and HRTF-grid containers
