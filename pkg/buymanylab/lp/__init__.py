from .optimal import OptimalMenu, opt_buy_one, opt_single_parameter

__all__ = ["OptimalMenu", "opt_buy_one", "opt_single_parameter"]
