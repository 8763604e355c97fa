# dualkit - dual-unitary and 2-unitary gate toolkit
