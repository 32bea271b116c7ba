"""Export every preset surface to OBJ and report the model checks.

    python3 demos/mesh_gallery.py [outdir]
"""
import os
import sys

from bryant.mesh import PRESET_NAMES, export_obj, preset, sample_surface


def main(outdir="meshes"):
    os.makedirs(outdir, exist_ok=True)
    for name in PRESET_NAMES:
        m = sample_surface(preset(name), (32, 24))
        path = os.path.join(outdir, f"{name}.obj")
        export_obj(m, path)
        if m.preset.euclidean:
            print(f"{name:28s} {len(m.vertices):5d} vertices  (R^3)")
        else:
            print(f"{name:28s} {len(m.vertices):5d} vertices  quadric residual "
                  f"{m.max_quadric_residual:.1e}  max |p| {m.max_radius:.4f}")
    print("wrote", outdir)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "meshes")
