from src.scene.geometry import (
    EPS0,
    MU0,
    SCENE_PRESETS,
    Inhomogeneity,
    MeasurementConfig,
    Point2,
    Scene,
    angular_positions,
    array_positions,
    check_separation,
    make_bistatic_array,
    reduce_angle,
)
