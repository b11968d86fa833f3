"""Clifford+T synthesis of data lookups, state preparation and isometries."""
