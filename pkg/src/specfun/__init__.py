from src.specfun.bessel import (
    bessel_j,
    bessel_j_orders,
    bessel_y0,
    bessel_y1,
    hankel1_0,
    hankel1_0_array,
)
from src.specfun.green import (
    FAR_FIELD_MIN_KR,
    far_field_green,
    far_field_green_array,
    green,
    green_array,
)

__all__ = [
    "bessel_j",
    "bessel_j_orders",
    "bessel_y0",
    "bessel_y1",
    "hankel1_0",
    "hankel1_0_array",
    "FAR_FIELD_MIN_KR",
    "far_field_green",
    "far_field_green_array",
    "green",
    "green_array",
]
