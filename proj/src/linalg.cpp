// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/linalg.hpp"

#include "opaque/error.hpp"

namespace opaque {

Mat matrix_power(const Mat& a, int k) {
    require_dims(a.rows() == a.cols(), "matrix_power: matrix is not square");
    if (k < 0) {
        throw InvalidArgument("matrix_power: negative exponent");
    }
    Mat result = Mat::Identity(a.rows(), a.cols());
    Mat base = a;
    while (k > 0) {
        if (k & 1) {
            result = result * base;
        }
        base = base * base;
        k >>= 1;
    }
    return result;
}

namespace {

int numerical_rank(const Eigen::JacobiSVD<Mat>& svd, double rel_tol) {
    const Vec& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    int r = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * s(0)) {
            ++r;
        }
    }
    return r;
}

} // namespace

Mat range_basis(const Mat& m, double rel_tol) {
    if (m.cols() == 0) {
        return Mat(m.rows(), 0);
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(numerical_rank(svd, rel_tol));
}

Mat complement_basis(const Mat& m, double rel_tol) {
    if (m.cols() == 0) {
        return Mat::Identity(m.rows(), m.rows());
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    int r = numerical_rank(svd, rel_tol);
    return svd.matrixU().rightCols(m.rows() - r);
}

} // namespace opaque
