"""
Simulation services: reputation, economics, scheduling, selection, training
oracle, population, the round simulator, metrics and experiment batches.
"""
