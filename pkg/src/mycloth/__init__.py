"""mycloth: interactive T-shirt customization with generative paints and virtual try-on."""

__version__ = "0.1.0"
