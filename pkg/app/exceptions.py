"""Исключения предметной области."""


class WatermarkError(Exception):
    """Базовая ошибка пакета."""


class ImageFormatError(WatermarkError, ValueError):
    """Файл изображения не читается или имеет неподдерживаемый формат."""


class DimensionMismatchError(WatermarkError, ValueError):
    """Размеры изображений, блоков или ключа несовместимы."""


class UndefinedNCError(WatermarkError, ValueError):
    """NC не определена: один из водяных знаков полностью черный."""


class PermutationError(WatermarkError, ValueError):
    """Перестановка не является биекцией нужной длины."""


class KeyFormatError(WatermarkError, ValueError):
    """Файл ключа поврежден или имеет неизвестную версию."""


class GAConfigError(WatermarkError, ValueError):
    """Недопустимые параметры генетического алгоритма или водяного знака."""


class AttackParameterError(WatermarkError, ValueError):
    """Недопустимые параметры атаки."""
