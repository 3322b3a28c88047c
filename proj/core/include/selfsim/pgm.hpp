#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "selfsim/mask.hpp"

namespace selfsim {

/// Parses binary PGM (P5, maxval 255) or PPM (P6, maxval 255). Colour input
/// is reduced with BT.601 luma, rounded half-up. Throws DataError naming the
/// byte offset of the problem.
GrayImage decode_pnm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

GrayImage load_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Foreground 255, background 0.
GrayImage mask_to_image(const BinaryMask& mask);

}  // namespace selfsim
