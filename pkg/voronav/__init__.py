import logging

__version__ = '0.1.0'

# applications opt in to logs by attaching handlers to the ``voronav`` logger
logging.getLogger(__name__).addHandler(logging.NullHandler())
