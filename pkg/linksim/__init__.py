"""
mcdrr-linksim - Multi-Channel Deficit Round-Robin on a hybrid TDM/WDM link.
Deterministic discrete-event simulator, scheduler library and fairness reports.
"""

__version__ = "0.1.0"
