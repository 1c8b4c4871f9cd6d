"""
Exceções do toolkit
"""
from typing import Any, List, Optional


class GeometryDomainError(ValueError):
    """Entrada fora do domínio de uma operação (raio <= 0, conjunto vazio, janela pequena...)"""


class ShapeSamplingError(GeometryDomainError):
    """Amostragem por rejeição com taxa de aceitação patológica"""


class ConfigError(ValueError):
    """Configuração inválida (settings.yaml ou arquivo de experimento)"""


class ChainClosureError(RuntimeError):
    """Falha numérica ao fechar uma cadeia de arcos da fronteira"""

    def __init__(self, message: str, fragment: Optional[List[Any]] = None):
        super().__init__(message)
        self.fragment = list(fragment or [])

    def __str__(self) -> str:
        base = super().__str__()
        if not self.fragment:
            return base
        return f"{base} (fragmento com {len(self.fragment)} arcos)"

    def __reduce__(self):
        # preserva o fragmento ao atravessar processos
        return (ChainClosureError, (self.args[0] if self.args else "", self.fragment))
