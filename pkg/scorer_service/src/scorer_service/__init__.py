"""Neural relevance scorer microservice.

Fine-tunes a miniature transformer sequence-pair classifier on exported
training pairs and serves positive-class probabilities over the scorer
wire protocol (HTTP JSON or newline-delimited JSON on stdio).
"""

__version__ = "0.1.0"
