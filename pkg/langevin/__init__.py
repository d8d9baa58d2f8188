"""Underdamped Langevin solvers, coupled Brownian noise and the adversarial lower-bound toolkit."""
