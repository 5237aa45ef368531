# -*- coding: utf-8 -*-
"""
Jerarquía de excepciones del laboratorio.

Todas las excepciones derivan de `WlabError` y llevan un `exit_code` que la
CLI usa al terminar: 2 para fallos de construcción o de verificación, 3 para
fallos de entrada/salida.
"""


class WlabError(Exception):
    """Error base del paquete."""

    exit_code = 2


# --- complexkit ---


class SingularityOnPath(WlabError):
    """Una singularidad declarada cae a menos de `pole_guard` del camino."""


class NoConvergence(WlabError):
    """Se agotó el presupuesto de refinamiento."""


class MultipleSingularities(WlabError):
    """Hay más de una singularidad dentro del círculo de residuos."""


class ZeroOnPath(WlabError):
    """La función se anula (o el conteo no es entero) sobre el contorno."""


class AliasingDetected(WlabError):
    """El tercio superior del espectro supera el umbral de energía."""


# --- diffpoly ---


class NotExact(WlabError):
    """El polinomio diferencial no es una derivada total."""


class InsufficientJetOrder(WlabError):
    """Los jets no llegan al orden de derivada que pide el polinomio."""


# --- weierstrass / catalog ---


class SingularPoint(WlabError):
    """Cero o polo de g, o cero de phi, en el punto pedido."""


class NotAGraph(WlabError):
    """La proyección vertical del fin tiene multiplicidad mayor que uno."""


class NotApplicable(WlabError):
    """La verificación no aplica a estos datos."""


class NonIntegerDegree(WlabError):
    """El grado de g no resultó entero."""


class PeriodSolveFailed(WlabError):
    """Ninguna rama de A_λ cierra los periodos."""


class ZeroVerticalFlux(WlabError):
    """El flujo vertical es nulo y no se puede normalizar."""


class NotDzNormalized(WlabError):
    """Los datos no están en la carta dh = dz."""


# --- shiffman ---


class SingularityOnLevel(WlabError):
    """La curva de nivel pasa por una singularidad."""


class SingularityOnLine(WlabError):
    """La línea muestreada pasa por una singularidad."""


class BranchPointOnGrid(WlabError):
    """La malla contiene un punto de ramificación de N (cero de g')."""


# --- kdvflow ---


class BranchObstruction(WlabError):
    """g da un número impar de vueltas a lo largo del periodo."""


class BlowupDetected(WlabError):
    """La solución creció por encima del umbral permitido."""


class PoleCollision(WlabError):
    """Un polo seguido se acercó demasiado a la línea."""


class TrackLost(WlabError):
    """El seguimiento de Newton de un polo no convergió."""


class GaugeMismatch(WlabError):
    """La u evolucionada se separa de la u recalculada desde g_t."""


# --- E/S ---


class ExportError(WlabError):
    """Fallo al escribir un archivo de salida."""

    exit_code = 3
