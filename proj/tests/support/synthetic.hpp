#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dst/image.hpp"

namespace dst::testing {

/// Zero-mean, unit-variance noise with a 1/f^beta amplitude spectrum
/// (beta = 0 gives white noise). Generated with a full complex DFT.
Plane colored_noise(int width, int height, double beta, std::uint64_t seed);

/// Circular Gaussian blur, exact in the frequency domain.
Plane gaussian_blur(const Plane& p, double sigma);

/// Deterministic stand-in for a photograph: sky/ground gradient, soft
/// ellipses, 1/f texture and a color cast, gamma encoded in (0, 1).
RgbImage synthetic_photo(int index, int width = 192, int height = 128);

/// Non-Gaussian sample drawn from one of several families picked by seed
/// (gamma, lognormal, uniform, beta, Student t, two-component mixtures).
std::vector<double> random_sample(std::size_t n, std::uint64_t seed);

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sigma = 1.0);

/// Gray 4x4-cell checkerboard of two levels; its luminance takes two values only.
RgbImage checkerboard(int width, int height);

}  // namespace dst::testing

namespace dst::testing {

/// Names of the photographs under tests/data, without extension.
const std::vector<std::string>& photo_names();
/// Loads tests/data/<name>.png (8-bit, gamma encoded).
RgbImage load_photo(const std::string& name);

}  // namespace dst::testing
