from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Union

import numpy as np

from src.qutrit.channels import ProcessMatrix
from src.qutrit.states import DensityMatrix, StateLike, _as_density, state_fidelity, trace_distance, purity
from src.tomography.process_tomography import process_fidelity, average_fidelity


class Metric(ABC):

    @abstractmethod
    def __call__(self, estimate: Union[DensityMatrix, ProcessMatrix]) -> float:
        raise NotImplementedError

    @abstractmethod
    def __str__(self):
        raise NotImplementedError


class StateMetric(Metric):

    def __init__(self, target: StateLike, name: str = None):
        self.target = _as_density(target)
        self.name = name

    @abstractmethod
    def compute_metric(self, estimate: DensityMatrix) -> float:
        raise NotImplementedError

    def __call__(self, estimate: DensityMatrix) -> float:
        if not isinstance(estimate, DensityMatrix):
            raise TypeError(f"{self.__class__.__name__} is computed on density matrices, "
                            f"got {type(estimate).__name__}")

        return self.compute_metric(estimate)

    def __str__(self):
        string = self.__class__.__name__
        if self.name is not None:
            string += f"@{self.name}"

        return string


class StateFidelity(StateMetric):

    def compute_metric(self, estimate: DensityMatrix) -> float:
        return state_fidelity(self.target, estimate)


class TraceDistance(StateMetric):

    def compute_metric(self, estimate: DensityMatrix) -> float:
        return trace_distance(self.target, estimate)


class Purity(Metric):

    def __call__(self, estimate: DensityMatrix) -> float:
        return purity(estimate)

    def __str__(self):
        return "Purity"


class ProcessMetric(Metric):

    def __init__(self, target_unitary: np.ndarray = None, name: str = None):
        # identity operation when no target is given
        self.target_unitary = np.eye(3) if target_unitary is None else np.asarray(target_unitary, dtype=complex)
        self.name = name

    def __str__(self):
        string = self.__class__.__name__
        if self.name is not None:
            string += f"@{self.name}"

        return string


class ProcessFidelity(ProcessMetric):

    def __call__(self, estimate: ProcessMatrix) -> float:
        return process_fidelity(estimate, self.target_unitary)


class AverageFidelity(ProcessMetric):

    def __call__(self, estimate: ProcessMatrix) -> float:
        return average_fidelity(estimate, self.target_unitary)
