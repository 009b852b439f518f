"""Log-log regression for scaling-law experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DecayFit:
    """Least-squares slope of log(value) against log(abscissa).

    `predicted` holds the model exponent the experiment is probing; `passed`
    is filled by the caller's acceptance rule (upper-bound envelope checks use
    slope <= predicted + slack rather than two-sided agreement).
    """

    abscissa: tuple
    values: tuple
    slope: float
    intercept: float
    stderr: float
    residual: float
    predicted: float | None = None
    slack: float | None = None
    passed: bool | None = None
    label: str = ""

    @property
    def confidence_band(self):
        """~95% band for the slope (2 standard errors)."""
        return (self.slope - 2.0 * self.stderr, self.slope + 2.0 * self.stderr)

    def to_dict(self):
        band = self.confidence_band
        return {
            "label": self.label,
            "abscissa": list(self.abscissa),
            "values": list(self.values),
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "residual": self.residual,
            "confidence_band": [band[0], band[1]],
            "predicted": self.predicted,
            "slack": self.slack,
            "passed": self.passed,
        }


def loglog_fit(abscissa, values, predicted=None, slack=None, label="",
               rule="upper"):
    """Fit log|values| ~ slope * log(abscissa) + b.

    rule: "upper"  -> passed iff slope <= predicted + slack
          "two_sided" -> passed iff |slope - predicted| <= slack
          None       -> passed left unset
    """
    x = np.log(np.asarray(abscissa, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    if x.size < 2:
        raise ValueError("need at least two points for a slope")
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    fitted = A @ coef
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)))
    dof = max(1, x.size - 2)
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(max(np.sum((y - fitted) ** 2) / dof, 0.0) / sxx) if sxx > 0 else math.inf
    passed = None
    if predicted is not None and slack is not None and rule is not None:
        if rule == "upper":
            passed = slope <= predicted + slack
        elif rule == "two_sided":
            passed = abs(slope - predicted) <= slack
        else:
            raise ValueError(f"unknown rule {rule!r}")
    return DecayFit(abscissa=tuple(float(v) for v in abscissa),
                    values=tuple(float(abs(v)) for v in values),
                    slope=slope, intercept=intercept, stderr=stderr,
                    residual=residual, predicted=predicted, slack=slack,
                    passed=passed, label=label)
