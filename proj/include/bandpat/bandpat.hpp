#pragma once

#include "bandpat/band.hpp"
#include "bandpat/emit.hpp"
#include "bandpat/expr.hpp"
#include "bandpat/extract.hpp"
#include "bandpat/field.hpp"
#include "bandpat/image_io.hpp"
#include "bandpat/oracle.hpp"
#include "bandpat/pipeline.hpp"
#include "bandpat/raster.hpp"
#include "bandpat/render.hpp"
#include "bandpat/scene_config.hpp"
