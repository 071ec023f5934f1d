import math

from fastapi import APIRouter, HTTPException

from app.core import simulator as simulator_core
from app.core.errors import EmaError
from app.schemas.simulation import PlaneWaveSource, TruthFile, TruthRequest

router = APIRouter(prefix="/simulation", tags=["simulation"])


@router.post("/truth", response_model=TruthFile)
async def truth_coefficients(request: TruthRequest):
    """Ideal ACN/N3D coefficients of a horizontal plane wave."""
    try:
        src = PlaneWaveSource(azimuth=math.radians(request.azimuth_deg), amplitude=request.amplitude)
        return simulator_core.truth_file(src, request.order)
    except EmaError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ValueError as e:
        raise HTTPException(status_code=422, detail=str(e))
