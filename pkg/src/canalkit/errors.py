"""Exception hierarchy for canalkit."""


class CanalError(ValueError):
    """Base class for all canalkit errors."""


class InvalidParams(CanalError):
    pass


class NotUnitSpeed(CanalError):
    pass


class VanishingCurvature(CanalError):
    pass


class NonPositiveRadius(CanalError):
    pass


class SlopeExceedsOne(CanalError):
    pass


class DegenerateQ(CanalError):
    """r'^2 = 1: both fundamental forms degenerate, the surface collapses."""


class NotASurface(CanalError):
    pass


class SingularPoint(CanalError):
    pass


class DegenerateSecondForm(CanalError):
    pass


class EmptyGrid(CanalError):
    pass


class RankDeficient(CanalError):
    pass


class AllSingular(CanalError):
    pass
