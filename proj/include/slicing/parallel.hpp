#pragma once

namespace slicing {

// Every parallel kernel keeps a serial reference path; both must produce
// bit-identical results.
enum class Exec { serial, parallel };

}  // namespace slicing
