from colorcount.version import __version__
