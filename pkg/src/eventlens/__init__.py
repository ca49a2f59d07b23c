"""Social-media event analysis: corpus cleaning, sentiment, networks, tail fitting, bots, streams."""

__version__ = "0.1.0"
