"""
quditkit: modeling, readout and analysis of transmon qudits
"""
