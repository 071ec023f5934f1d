from fastapi import APIRouter, HTTPException

from app.core import harmonics as harmonics_core
from app.core.errors import EmaError
from app.schemas.simulation import EquatorTableResponse

router = APIRouter(prefix="/harmonics", tags=["harmonics"])


@router.get("/equator-table/{order}", response_model=EquatorTableResponse)
async def equator_table(order: int):
    """N_{n,m}(pi/2) up to ``order`` in ACN order."""
    try:
        table = harmonics_core.equator_table(order)
    except EmaError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return EquatorTableResponse(
        max_order=table.max_order,
        values=table.values.tolist(),
        zero_channels=[int(c) for c in (table.values == 0).nonzero()[0]],
        note="channels with odd n+|m| vanish on the equator",
    )
