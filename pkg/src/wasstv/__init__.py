"""Image reconstruction with a Benamou-Brenier (Wasserstein) template prior and TV."""

from .grid import DualState, MomentumField, SpaceTimeGrid, time_slice, total_mass
from .forward import KSpaceData, SamplingMask, fourier_adjoint, fourier_forward, make_radial_mask, zero_fill_recon
from .solver import SolverConfig, reconstruct, rho_prox, transport_geodesic
from .baseline import TvConfig, tv_reconstruct
from .metrics import psnr, ssim

__version__ = "0.1.0"
