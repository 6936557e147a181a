"""Published closed-form coefficients C1..C10, keyed by (metal, pattern, strategy)."""
from src.crossbar.topology import Metal, PatternKind, Strategy

PUBLISHED_COEFFICIENTS = {
    (Metal.M3, PatternKind.ALL_ONES, Strategy.FRC): (
        -2.765766e-04, -3.552098e-05, 4.599539e-03, 1.722779e-02, -4.296973e-04,
        -1.275372e-03, 9.867175e-01, -1.056307e-01, 1.529703e+00, -1.154712e+00,
    ),
    (Metal.M3, PatternKind.ALL_ONES, Strategy.GRFC): (
        -5.271610e-04, -7.224109e-04, 2.568702e-03, 3.588961e-02, -9.912720e-03,
        -2.229373e-02, 6.749072e-01, -1.838965e-01, 1.871899e+00, -3.592643e+00,
    ),
    (Metal.M3, PatternKind.ALL_ONES, Strategy.FRGC): (
        -3.118053e-05, -9.791516e-04, -3.942867e-03, -1.070919e-02, -3.415353e-02,
        -1.746779e-01, -2.319980e-02, -3.936425e-01, 1.029943e+00, -8.795638e+00,
    ),
    (Metal.M3, PatternKind.ALL_ONES, Strategy.GRC): (
        -3.422062e-05, -9.441148e-04, -3.851644e-03, -9.972648e-03, -3.305335e-02,
        -1.730254e-01, 1.489677e-02, -3.919864e-01, 1.054458e+00, -8.468067e+00,
    ),
    (Metal.M3, PatternKind.ALL_ZEROS, Strategy.FRC): (
        -2.768951e-04, -2.337750e-05, 4.602914e-03, 1.747226e-02, -1.110902e-03,
        -1.192496e-03, -3.901237e-02, -1.029701e-01, 1.521661e+00, -2.441334e+01,
    ),
    (Metal.M3, PatternKind.ALL_ZEROS, Strategy.GRFC): (
        -5.173225e-04, -7.911723e-05, 4.479660e-03, 4.457329e-02, -1.103802e-03,
        -3.191236e-03, -3.450177e-02, -1.556039e-01, 2.102373e+00, -2.416504e+01,
    ),
    (Metal.M3, PatternKind.ALL_ZEROS, Strategy.FRGC): (
        6.728880e-08, -1.496197e-04, -8.406540e-04, -1.435455e-03, -2.031960e-03,
        -6.087109e-03, -6.308356e-02, -2.579691e-02, 2.995661e+00, -2.428478e+01,
    ),
    (Metal.M3, PatternKind.ALL_ZEROS, Strategy.GRC): (
        7.209101e-08, -1.496397e-04, -8.401264e-04, -1.437187e-03, -2.030510e-03,
        -6.086547e-03, -6.303070e-02, -2.578021e-02, 2.995596e+00, -2.428423e+01,
    ),
    (Metal.M5, PatternKind.ALL_ONES, Strategy.FRC): (
        -2.764303e-04, -5.936502e-05, 4.487461e-03, 1.695349e-02, -7.048080e-04,
        -2.179162e-03, 9.783429e-01, -1.081555e-01, 1.524105e+00, -1.225103e+00,
    ),
    (Metal.M5, PatternKind.ALL_ONES, Strategy.GRFC): (
        -5.369728e-04, -1.011910e-03, 1.771752e-03, 3.218355e-02, -1.162975e-02,
        -2.706075e-02, 6.228614e-01, -1.901170e-01, 1.817728e+00, -4.002326e+00,
    ),
    (Metal.M5, PatternKind.ALL_ONES, Strategy.FRGC): (
        -3.317372e-05, -1.426496e-03, -5.595220e-03, -1.690781e-02, -3.488875e-02,
        -1.823875e-01, -3.333252e-02, -3.993790e-01, 9.227569e-01, -8.767657e+00,
    ),
    (Metal.M5, PatternKind.ALL_ONES, Strategy.GRC): (
        -3.607482e-05, -1.405009e-03, -5.549250e-03, -1.636382e-02, -3.399748e-02,
        -1.810900e-01, -2.208753e-03, -3.982103e-01, 9.431813e-01, -8.499305e+00,
    ),
    (Metal.M5, PatternKind.ALL_ZEROS, Strategy.FRC): (
        -2.795334e-04, -4.490970e-05, 4.561308e-03, 1.732497e-02, -2.417057e-04,
        -1.532339e-03, -5.741777e-03, -1.062961e-01, 1.527636e+00, -2.411070e+01,
    ),
    (Metal.M5, PatternKind.ALL_ZEROS, Strategy.GRFC): (
        -5.162575e-04, -1.323556e-04, 4.208091e-03, 4.394577e-02, -1.852363e-03,
        -5.523961e-03, -5.769302e-02, -1.624248e-01, 2.088758e+00, -2.436257e+01,
    ),
    (Metal.M5, PatternKind.ALL_ZEROS, Strategy.FRGC): (
        1.109504e-06, -2.524449e-04, -1.425890e-03, -2.493809e-03, -3.402301e-03,
        -1.053107e-02, -1.051583e-01, -4.035391e-02, 2.976207e+00, -2.464774e+01,
    ),
    (Metal.M5, PatternKind.ALL_ZEROS, Strategy.GRC): (
        1.100590e-06, -2.524109e-04, -1.425737e-03, -2.492790e-03, -3.402806e-03,
        -1.053004e-02, -1.051793e-01, -4.034864e-02, 2.976206e+00, -2.464794e+01,
    ),
    (Metal.M6, PatternKind.ALL_ONES, Strategy.FRC): (
        -2.765330e-04, -9.275605e-06, 4.723620e-03, 1.751128e-02, -1.186960e-04,
        -3.378056e-04, 9.963053e-01, -1.029360e-01, 1.534969e+00, -1.073100e+00,
    ),
    (Metal.M6, PatternKind.ALL_ONES, Strategy.GRFC): (
        -5.136305e-04, -3.903261e-04, 3.578035e-03, 3.976450e-02, -7.747277e-03,
        -1.659931e-02, 7.411125e-01, -1.751892e-01, 1.929448e+00, -3.058583e+00,
    ),
    (Metal.M6, PatternKind.ALL_ONES, Strategy.FRGC): (
        -1.469021e-05, -3.335456e-04, -1.398252e-03, -3.205943e-03, -3.295507e-02,
        -1.633178e-01, -5.549090e-03, -3.814526e-01, 1.164724e+00, -8.790361e+00,
    ),
    (Metal.M6, PatternKind.ALL_ONES, Strategy.GRC): (
        -1.697019e-05, -2.664594e-04, -1.188272e-03, -2.113479e-03, -3.143524e-02,
        -1.609204e-01, 4.635883e-02, -3.785520e-01, 1.196345e+00, -8.344802e+00,
    ),
    (Metal.M6, PatternKind.ALL_ZEROS, Strategy.FRC): (
        -2.744689e-04, -1.905130e-05, 4.644600e-03, 1.729086e-02, -6.912710e-04,
        -5.466582e-05, -2.498576e-02, -1.014793e-01, 1.538061e+00, -2.429351e+01,
    ),
    (Metal.M6, PatternKind.ALL_ZEROS, Strategy.GRFC): (
        -5.168549e-04, -2.198834e-05, 4.760412e-03, 4.514727e-02, -2.288891e-04,
        -7.376962e-04, -6.894301e-03, -1.482829e-01, 2.116129e+00, -2.392658e+01,
    ),
    (Metal.M6, PatternKind.ALL_ZEROS, Strategy.FRGC): (
        -1.772653e-07, -3.958725e-05, -2.236606e-04, -3.611497e-04, -5.495305e-04,
        -1.586451e-03, -1.715344e-02, -1.070043e-02, 3.012977e+00, -2.388512e+01,
    ),
    (Metal.M6, PatternKind.ALL_ZEROS, Strategy.GRC): (
        -1.834111e-07, -3.958864e-05, -2.236878e-04, -3.607864e-04, -5.487445e-04,
        -1.588074e-03, -1.712207e-02, -1.069628e-02, 3.012930e+00, -2.388481e+01,
    ),
}
