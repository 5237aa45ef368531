# -*- coding: utf-8 -*-
"""
Módulo de Programación Orientada a Aspectos (AOP).

Decoradores que implementan incumbencias transversales de los comandos y de
las construcciones costosas del laboratorio, sin mezclarlas con el cálculo.

Aspectos implementados:
- cache: memoización en memoria con TTL (p. ej. el cierre de periodos de los
  ejemplos de Riemann).
- metrics: medición del tiempo de ejecución.
- audit: registro de los comandos invocados y sus argumentos.
- validate_with: validación de la configuración con Pydantic.
"""
import functools
import logging
import time

import click
from pydantic import ValidationError

logger = logging.getLogger(__name__)

# --- Caché en memoria ---
# Las claves se generan a partir del nombre de la función y sus argumentos.
_cache = {}


def cache(ttl=3600):
    """
    Aspecto de caché para guardar en memoria el resultado de una función pura.

    Args:
        ttl (int): segundos que el resultado permanece válido.

    Uso:
        @cache(ttl=600)
        def construccion_costosa(lam):
            ...
    """

    def decorator(fn):
        @functools.wraps(fn)
        def wrapped(*args, **kwargs):
            key = f"{fn.__name__}:{args}:{sorted(kwargs.items())}"
            now = time.time()
            if key in _cache:
                result, timestamp = _cache[key]
                if now - timestamp < ttl:
                    logger.debug("CACHE: Hit para la clave '%s'.", key)
                    return result
                logger.debug("CACHE: Clave expirada '%s'.", key)

            logger.debug("CACHE: Miss para la clave '%s'. Cacheando resultado.", key)
            result = fn(*args, **kwargs)
            _cache[key] = (result, now)
            return result

        return wrapped

    return decorator


def metrics(fn):
    """
    Aspecto de métricas: registra el tiempo que tarda la función decorada,
    también cuando termina con una excepción.
    """

    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        start_time = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            duration = time.perf_counter() - start_time
            logger.info("METRICAS para '%s': tiempo de ejecución %.4fs", fn.__name__, duration)

    return wrapped


def audit(action=""):
    """
    Aspecto de auditoría: deja constancia de la acción y sus argumentos.

    Args:
        action (str): descripción de la acción.
    """

    def decorator(fn):
        @functools.wraps(fn)
        def wrapped(*args, **kwargs):
            logger.info("AUDITORIA: acción '%s' con argumentos %s.", action, kwargs)
            return fn(*args, **kwargs)

        return wrapped

    return decorator


def validate_with(schema):
    """
    Aspecto de validación de la configuración de un comando con Pydantic.

    Combina la configuración cargada en el contexto de click con las opciones
    del comando que no son None, la valida contra `schema` y deja el modelo en
    `ctx.obj["run_config"]`. Si la validación falla, el comando termina con un
    error de uso (código 2).

    Uso:
        @click.command()
        @click.pass_context
        @validate_with(RunConfig)
        def comando(ctx, **opciones):
            cfg = ctx.obj["run_config"]
    """

    def decorator(fn):
        @functools.wraps(fn)
        def wrapped(ctx, *args, **kwargs):
            data = dict(ctx.obj.get("config", {}))
            data.update({k: v for k, v in kwargs.items() if v is not None})
            try:
                ctx.obj["run_config"] = schema.model_validate(data)
                logger.debug("VALIDACION: la configuración de '%s' es válida.", fn.__name__)
            except ValidationError as e:
                logger.warning("ERROR_VALIDACION: %s", e.errors())
                lines = []
                for error in e.errors():
                    field = " ".join(str(loc) for loc in error["loc"])
                    lines.append(f"Error de validación para '{field}': {error['msg']}")
                raise click.UsageError("\n".join(lines), ctx=ctx) from e
            return fn(ctx, *args, **kwargs)

        return wrapped

    return decorator
