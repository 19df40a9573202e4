"""Satisfiability of spatio-temporal description logic concepts via weak alternating automata."""
