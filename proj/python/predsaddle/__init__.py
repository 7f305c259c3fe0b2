"""Prediction-step saddle-point optimization: alternating descent/ascent with
a primal extrapolation step, bilinear-dynamics oracles, and toy-GAN machinery."""

from predsaddle._core import *  # noqa: F401,F403
from predsaddle._core import __version__  # noqa: F401
