"""CarrierGrid model."""

from typing import Tuple

from pydantic import BaseModel, ConfigDict


class CarrierGrid(BaseModel):
    """
    The K carriers of the wideband signal.

    Attributes:
        indices: Carrier indices in frequency order, {-K/2..-1, 1..K/2}.
        centers: Carrier center frequencies f_k, Hz.
        band_lo: Lower signal-band edge per carrier, Hz.
        band_hi: Upper signal-band edge per carrier, Hz.
        f_c: Central frequency, Hz.
        W_sb: Signal bandwidth per carrier, Hz.
        W_gb: Guard bandwidth per carrier, Hz.
    """

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]
    centers: Tuple[float, ...]
    band_lo: Tuple[float, ...]
    band_hi: Tuple[float, ...]
    f_c: float
    W_sb: float
    W_gb: float

    @property
    def K(self) -> int:
        return len(self.indices)

    @property
    def W_ch(self) -> float:
        return self.W_sb + self.W_gb

    def position(self, k: int) -> int:
        """Position of carrier ``k`` in frequency order."""
        try:
            return self.indices.index(k)
        except ValueError:
            raise ValueError(f"carrier {k} is not in the grid") from None

    def center(self, k: int) -> float:
        return self.centers[self.position(k)]
