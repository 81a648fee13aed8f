"""ML-KEM ciphertext-size, reliability and TLS handshake overhead analysis."""

__version__ = "0.1.0"
