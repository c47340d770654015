from src.qutrit.basis import DIM, LAMBDA_MATRICES, LAMBDA_BASIS, LambdaBasis, lambda_expand, lambda_combine
from src.qutrit.states import (BASIS_LABELS, QutritKet, DensityMatrix, ket_to_density, state_fidelity,
                               trace_distance, purity, random_pure_ket, random_density, random_unitary,
                               KET_L, KET_G, KET_R, PSI_1, PSI_2)
from src.qutrit.channels import (ProcessMatrix, apply_channel, identity_process, unitary_process,
                                 depolarizing_process, compose, tp_residual)
