#pragma once

#include "ptscat/born.hpp"
#include "ptscat/geometry.hpp"
#include "ptscat/media.hpp"
#include "ptscat/oracle.hpp"
