"""
fedjobs: fairness-aware scheduling of concurrent federated learning jobs.

Simulates several FL jobs competing for a shared pool of clients, ordered by
the Lyapunov-based Job Scheduling Index (FairFedJS) or by a baseline policy.
"""

__version__ = "0.1.0"
