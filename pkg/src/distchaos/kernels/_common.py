"""Constants shared by the numba and numpy kernel implementations."""

import numpy as np

# segment kinds understood by the tracker
SEG_NONE = -1
SEG_W = 0
SEG_U = 1
SEG_V = 2
SEG_E = 3

# tracker status codes
ST_DONE = 0
ST_ESCAPE = 1
ST_NONFINITE = 2
ST_MAXSTEPS = 3
ST_LEFT_WATCH = 4
ST_EXITED = 5

STATUS_NAMES = {
    ST_DONE: "done",
    ST_ESCAPE: "escape",
    ST_NONFINITE: "nonfinite",
    ST_MAXSTEPS: "max_steps",
    ST_LEFT_WATCH: "left_watch",
    ST_EXITED: "exited",
}

# outward face normals of the octagon B(s): angle k*pi/4
OCT_COS = np.cos(np.arange(8) * np.pi / 4)
OCT_SIN = np.sin(np.arange(8) * np.pi / 4)

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# b5 - b4 (error weights)
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
BISECT_TOL = 1e-10
PARAM_LEN = 8
