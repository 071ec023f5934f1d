from fastapi import APIRouter, HTTPException

from app.core import radial as radial_core
from app.core.errors import EmaError
from app.schemas.radial import FilterBankSummary, RadialConfig

router = APIRouter(prefix="/filters", tags=["filters"])


@router.post("/design", response_model=FilterBankSummary)
def design_filters(cfg: RadialConfig):
    """Design the equalization bank and summarize it (delay, peak gains, valid bands)."""
    try:
        return radial_core.design_equalizers(cfg).summary()
    except EmaError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
