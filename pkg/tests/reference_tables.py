"""Known coefficient tables of P_n and P-hat_n for n <= 10, ascending powers of k."""

P_TABLE = {
    1: [1],
    2: [-1, 0, 3],
    3: [4, 6, -4, -7, 8, 4],
    4: [-10, -17, 14, 34, 0, -20, 14, 7],
    5: [28, 54, -50, -147, -4, 134, 56, -47, 12, 6],
    6: [-504, -1512, 2, 4212, 3568, -2688, -4427, -267, 2064, 508, -151, 107, 84, 12],
    7: [1584, 5136, 132, -16344, -14682, 14024, 23793, 175, -13839, -4467, 4597, 2043, -226, -18, 56, 8],
    8: [-5148, -17952, -1227, 63975, 62404, -66498, -122671, 743, 90795, 33965, -26735, -17859, 6093, 4127, -230, 10, 105, 15],
    9: [34320, 145288, 79788, -495246, -789372, 327437, 1503045, 569036, -1119830, -973159, 246145, 543985, 93111, -132601, -38899, 22252, 8104, -343, 65, 117, 13],
    10: [-466752, -2207920, -1797928, 7441628, 15217542, -2449280, -29954584, -18143346, 22790446, 29470120, -1946970, -18246084, -6425791, 4457207, 3284727, -286343, -625902, 14296, 90809, 14027, -27, 705, 234, 18],
}

PHAT_TABLE = {
    1: [1],
    2: [-2, 0, 3],
    3: [10, 9, -16, -13, 8, 4],
    4: [-28, -34, 52, 63, -34, -37, 14, 7],
    5: [84, 126, -182, -316, 114, 263, -20, -85, 12, 6],
    6: [-1584, -4128, 1212, 11388, 5826, -9296, -8259, 2181, 3432, -208, -641, 37, 84, 12],
    7: [5148, 14784, -3705, -47255, -28209, 47479, 49794, -14762, -30289, -1437, 8399, 1209, -1038, -134, 56, 8],
    8: [-17160, -53768, 10522, 194024, 133519, -230229, -281085, 82709, 217496, 22370, -75671, -18711, 14270, 3378, -1525, -175, 105, 15],
    9: [116688, 454168, 145948, -1608678, -2038568, 1511634, 4052054, 608204, -3270866, -1794798, 1101406, 1078569, -84069, -286096, -25510, 38311, 4723, -2665, -193, 117, 13],
    10: [-1612416, -7093216, -4266288, 25221880, 42333788, -17953072, -87108698, -33300902, 73811749, 65449953, -20938025, -43470981, -5900291, 12818397, 4606256, -1807088, -1011109, 124941, 105761, -3481, -5019, 321, 234, 18],
}
