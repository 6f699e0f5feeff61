"""Single-unit continuous double auction: equilibria, payoffs, welfare, simulation."""

from ._core import (
    CdaError,
    Market,
    Solution,
    __version__,
    buyer_payoff,
    competitive_equilibrium,
    one_price_payoff,
    seller_payoff,
    simulate,
    solve_bne,
    welfare,
)

__all__ = [
    "CdaError",
    "Market",
    "Solution",
    "__version__",
    "buyer_payoff",
    "competitive_equilibrium",
    "one_price_payoff",
    "seller_payoff",
    "simulate",
    "solve_bne",
    "welfare",
]
