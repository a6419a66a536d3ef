"""MWPM against BP-OSD on the same sampled syndromes of a noisy surface memory."""
from qecforge.codes import CodeSpec, generate_memory
from qecforge.decode import Decoder, logical_error_rate
from qecforge.noise import apply_noise, si1000
from qecforge.sim import compile_dem, frame_sample

circuit = apply_noise(generate_memory(CodeSpec("surface", 3, rounds=3)), si1000(0.004))
dem = compile_dem(circuit, approximate_disjoint=True)
det, obs = frame_sample(circuit, 20_000, seed=1)
for kind, variant, order in (("mwpm", "batch", 0), ("bposd", "batch", 0), ("bposd", "parity_check", 4)):
    r = logical_error_rate(Decoder(dem, kind, variant, order).decode_batch(det), obs)
    print(f"{kind:<6} {variant:<13} osd={order}  LER={r.rate:.4f} +- {r.stderr:.4f}")
