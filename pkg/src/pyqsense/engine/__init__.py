"""Monte-Carlo experiment engine: shots, sweeps, readout, decay curves and ODMR scans."""
