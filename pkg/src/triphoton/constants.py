"""Physical constants."""

SPEED_OF_LIGHT = 299_792_458.0  # vacuum speed of light, m/s
