#pragma once

#include <string>
#include <vector>

#include "flowrec/field.hpp"

namespace flowrec {

// Raw dumps are little-endian float64, row-major (row j=0 first), written to
// <path>.f64 with a text descriptor at <path>.txt. Loading checks the
// descriptor against the byte count.
void dump_field(const ScalarField& f, const std::string& path_base);
ScalarField load_field(const std::string& path_base);

// Flat array variant used for sinograms; dims/extent live in the descriptor.
void dump_raw(const double* data, size_t count, const std::string& path_base,
              const std::string& descriptor);

// Reads back a flat dump, checking the element count.
std::vector<double> load_raw(const std::string& path_base,
                             size_t expected_count);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// 16-bit grayscale PNG with a linear window [lo,hi] -> [0,65535]; values are
// clamped. Row 0 of the image is the top of the picture (largest y), so the
// picture matches the mathematical orientation of the domain. The window is
// recorded in <path>.txt next to the image.
void write_png16(const ScalarField& f, const std::string& path_base, double lo,
                 double hi);

}  // namespace flowrec
