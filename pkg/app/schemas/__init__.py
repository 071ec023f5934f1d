# Pydantic models for configuration, file headers and API payloads
