#pragma once

#include <string>

#include "inrc/image.hpp"

namespace inrc {

// Reads an 8-bit PNG or binary PPM (P6) into [0, 1] doubles. The format
// is detected from the file's magic bytes. Throws CodecError subclasses
// on unreadable or malformed files.
ImageBuffer load_image(const std::string& path);

// Writes 8-bit PNG or PPM depending on the file extension (.png ends up
// as PNG, everything else as P6). Values are clamped to [0, 1] and
// rounded to the nearest of 256 levels, so an 8-bit load/save round trip
// is lossless.
void save_image(const std::string& path, const ImageBuffer& image);

}  // namespace inrc
