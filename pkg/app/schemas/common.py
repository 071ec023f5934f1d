from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from app.core.errors import ConfigurationError

ModelT = TypeVar("ModelT", bound=BaseModel)


def parse_model(model: type[ModelT], data: Any) -> ModelT:
    """Validate ``data`` into ``model``, reporting failures as ConfigurationError."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or model.__name__}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigurationError(f"invalid {model.__name__}: {problems}") from e
