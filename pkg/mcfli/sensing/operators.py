import abc
import logging

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)


def inner(a: npt.NDArray, b: npt.NDArray) -> float:
    """Real inner product Re <a, b>, the one all operators are adjoint under."""
    return float(np.vdot(a, b).real)


class LinearOperator(abc.ABC):

    def __init__(self,
                 input_shape: tuple[int, ...],
                 output_shape: tuple[int, ...],
                 input_dtype: type = float,
                 output_dtype: type = float) -> None:
        """Linear operator abstract base class

        Parameters
        ----------
        input_shape : tuple
            shape of x array
        output_shape : tuple
            shape of y array
        input_dtype, output_dtype : type
            ``float`` for real spaces, ``complex`` for Hermitian-matrix spaces
        """
        self._input_shape = tuple(input_shape)
        self._output_shape = tuple(output_shape)
        self._input_dtype = input_dtype
        self._output_dtype = output_dtype

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self._input_shape

    @property
    def output_shape(self) -> tuple[int, ...]:
        return self._output_shape

    @abc.abstractmethod
    def forward(self, x: npt.NDArray) -> npt.NDArray:
        """forward step

        Parameters
        ----------
        x : npt.NDArray
            x array

        Returns
        -------
        npt.NDArray
            the linear operator applied to x
        """
        raise NotImplementedError()

    @abc.abstractmethod
    def adjoint(self, y: npt.NDArray) -> npt.NDArray:
        """adjoint of forward step

        Parameters
        ----------
        y : npt.NDArray
            y array

        Returns
        -------
        npt.NDArray
            the adjoint of the linear operator applied to y
        """
        raise NotImplementedError()

    def __call__(self, x: npt.NDArray) -> npt.NDArray:
        return self.forward(x)

    def _random(self, shape, dtype, rng: np.random.Generator) -> npt.NDArray:
        x = rng.standard_normal(shape)
        if dtype is complex:
            x = x + 1j * rng.standard_normal(shape)
            if len(shape) == 2 and shape[0] == shape[1]:
                # matrix spaces of this package are Hermitian
                x = 0.5 * (x + x.conj().T)
        return x

    def random_input(self, rng: np.random.Generator) -> npt.NDArray:
        return self._random(self.input_shape, self._input_dtype, rng)

    def random_output(self, rng: np.random.Generator) -> npt.NDArray:
        return self._random(self.output_shape, self._output_dtype, rng)

    def adjointness_test(self, rng: np.random.Generator | None = None, trials: int = 1) -> float:
        """largest relative mismatch between <A x, y> and <x, A^T y> over random pairs

        The mismatch is normalized by ||A x|| ||y||.
        """
        rng = np.random.default_rng(rng)
        worst = 0.0
        for _ in range(trials):
            x = self.random_input(rng)
            y = self.random_output(rng)
            x_fwd = self.forward(x)
            y_back = self.adjoint(y)
            a = inner(y, x_fwd)
            b = inner(y_back, x)
            scale = max(np.linalg.norm(x_fwd) * np.linalg.norm(y), np.finfo(float).tiny)
            worst = max(worst, abs(a - b) / scale)
        logger.debug("%s adjointness mismatch %.3e", type(self).__name__, worst)
        return worst

    def norm(self, num_iter: int = 100, seed: int = 0, rtol: float = 1e-10) -> float:
        """estimate norm of operator via power iterations

        Parameters
        ----------
        num_iter : int, optional
            maximal number of iterations, by default 100
        seed : int, optional
            seed of the random start vector
        rtol : float, optional
            stop once the estimate changes by less than this fraction

        Returns
        -------
        float
            the estimated norm
        """
        rng = np.random.default_rng(seed)
        x = self.random_input(rng)
        estimate = 0.0
        for i in range(num_iter):
            nx = np.linalg.norm(x)
            if nx == 0:
                return 0.0
            x = self.adjoint(self.forward(x / nx))
            new = float(np.sqrt(np.linalg.norm(x)))
            if abs(new - estimate) <= rtol * new:
                estimate = new
                break
            estimate = new
        return estimate
