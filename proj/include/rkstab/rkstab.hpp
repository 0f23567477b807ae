#pragma once

#include "rkstab/common.hpp"
#include "rkstab/sign_matrix.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"
#include "rkstab/lambda_bounds.hpp"
#include "rkstab/kernels.hpp"
#include "rkstab/stability.hpp"
#include "rkstab/verify.hpp"
