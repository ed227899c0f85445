TRANSLATIONS = {
    # --- General ---
    "operation_success": "Operation successful",
    "internal_error": "Internal error: {error}",
    "sys_unhandled_exception": "Unhandled exception in command {command}: {stack}",

    # --- CLI ---
    "cli_command_start": "Running command: {command}",
    "cli_command_failed": "Command failed [{category}]: {message}",
    "cli_missing_argument": "Missing required argument {flag} for command {command}",
    "cli_input_not_found": "Input path not found: {path}",
    "cli_manifest_written": "Run manifest written: {path}",

    # --- Config ---
    "config_bad_value": "Invalid value for {key}: {value}",
    "config_file_not_found": "Config file not found: {path}",
    "config_file_loaded": "Config file loaded: {path}",
    "config_line_malformed": "Malformed line {line} in {path}, expected key=value",
    "config_unknown_key": "Ignoring unknown setting {key} (from {source})",

    # --- Utils ---
    "utils_dir_not_found": "Directory not found: {path}",
    "utils_file_not_found_md5": "Cannot compute MD5, file not found: {path}",

    # --- Schedule ---
    "schedule_bad_steps": "Step count must be at least 1, got {steps}",
    "schedule_bad_eta_per_step": "Variance increment must be a positive finite number, got {value}",
    "schedule_bad_sigma_range": "Invalid increment range [{low}, {high}]",
    "schedule_too_short": "Schedule needs at least two entries",
    "schedule_eta0_nonzero": "Schedule must start at zero variance, got {value}",
    "schedule_not_increasing": "Schedule must be strictly increasing",
    "schedule_step_out_of_range": "Step {k} is outside [{lower}, {upper}]",
    "schedule_bad_level": "Noise level must be a non-negative finite number, got {level}",
    "schedule_level_unreachable": "Noise level {level} exceeds the schedule maximum {maximum}",

    # --- Images ---
    "image_bad_shape": "Image must have shape [C, H, W], got {shape}",
    "image_not_positive": "Intensity image must be finite and strictly positive",
    "image_above_one": "Intensity image values must not exceed 1",
    "log_image_not_finite": "Log-domain image must be finite",
    "raw_image_bad_dims": "Invalid raw image dimensions {width}x{height}x{channels}",
    "raw_image_sample_count": "Raw image expects {expected} samples, got {actual}",

    # --- Forward process ---
    "forward_noise_shape": "Noise shape must be {expected}, got {actual}",
    "corrupt_start": "Corrupting {count} image(s) at step {k} (eta={eta})",
    "corrupt_done": "Corrupted {count} image(s)",

    # --- Score ---
    "score_delta_degenerate": "Score is undefined at step {k}: kernel variance is zero",
    "score_gaussian_degenerate": "Score is undefined at step {k}: total variance is zero",
    "score_negative_variance": "Prior variance must be non-negative",
    "score_shape_mismatch": "Shape mismatch: {left} vs {right}",

    # --- Neural network ---
    "nn_shape_mismatch": "Operation {primitive} received incompatible shapes {shapes}",
    "nn_backward_not_scalar": "backward() needs a scalar output, got shape {shape}",
    "nn_grad_shape": "Gradient for {name} must have shape {expected}, got {actual}",
    "nn_embedding_odd_dim": "Embedding dimension must be a positive even number, got {dim}",
    "nn_embedding_negative_step": "Step index must be non-negative, got {k}",
    "nn_bad_widths": "Network widths must be positive, got {widths}",
    "nn_bad_hidden": "Hidden size must be positive, got {hidden}",
    "nn_unknown_kind": "Unknown network kind: {kind}",
    "nn_input_shape": "Network input must be [N, {channels}, H, W] with H and W multiples of {multiple}, got {shape}",
    "nn_step_batch_mismatch": "Got {steps} step indices for a batch of {batch}",
    "adam_count_mismatch": "Optimizer got {params} parameters, {grads} gradients and {moments} moments",
    "adam_shape_mismatch": "Optimizer shape mismatch at {index} ({name}): expected {expected}, got {actual}",

    # --- Dataset ---
    "dataset_empty_dir": "No PNM images found in {path}",
    "dataset_all_skipped": "Every image in {path} was skipped",
    "dataset_loaded": "Loaded {count} image(s) from {path} (patch {patch})",
    "dataset_skip_unreadable": "Skipping unreadable image {path}: {error}",
    "dataset_skip_small": "Skipping {path}: smaller than {size}x{size}",
    "dataset_skip_channels": "Skipping {path}: {channels} channel(s), expected {expected}",

    # --- PNM ---
    "pnm_bad_magic": "Unsupported PNM magic {magic}, expected P5 or P6",
    "pnm_expected_number": "Expected {what} at byte {offset}",
    "pnm_bad_dims": "Invalid dimensions {width}x{height} at byte {offset}",
    "pnm_bad_maxval": "Invalid maxval {maxval} at byte {offset}",
    "pnm_unsupported_maxval": "Only 8-bit images (maxval 255) are supported, got {maxval}",
    "pnm_missing_separator": "Missing whitespace after header at byte {offset}",
    "pnm_truncated": "Pixel data truncated at byte {offset}: expected {expected} bytes, got {actual}",

    # --- Training ---
    "train_bad_counts": "Invalid training counts: epochs={epochs} batch={batch} steps={steps} interval={interval}",
    "train_bad_lr": "Invalid learning rate {lr} (final {lr_final})",
    "train_bad_patch": "Patch size must be positive, got {patch}",
    "train_patch_network_mismatch": "Patch size {patch} must be a multiple of {multiple} for this network",
    "train_empty_dataset": "Training dataset is empty",
    "train_non_finite_loss": "Loss became non-finite at step {step} (diffusion steps {k})",
    "train_zero_step_in_batch": "Training steps must be at least 1",
    "train_start": "Training {kind} network ({params} parameters) for {epochs} epoch(s), {steps_per_epoch} step(s) per epoch",
    "train_epoch_done": "Epoch {epoch}/{epochs} mean loss {loss:.6g} lr {lr:.3g}",
    "train_done": "Training finished, checkpoint saved to {path}",
    "inspect_done": "Checkpoint header read: {path}",

    # --- Checkpoint ---
    "checkpoint_truncated": "Checkpoint truncated while reading {what} at byte {offset}",
    "checkpoint_bad_magic": "Not a checkpoint file (bad magic at byte {offset})",
    "checkpoint_not_found": "Checkpoint file not found: {path}",
    "checkpoint_unsupported_version": "Unsupported checkpoint version {version}, this build reads version {supported}",
    "checkpoint_bad_field": "Checkpoint field {field} is not valid UTF-8 at byte {offset}",
    "checkpoint_missing_field": "Checkpoint header lacks {field} (byte {offset})",
    "checkpoint_bad_header": "Checkpoint header is invalid at byte {offset}: {error}",
    "checkpoint_blob_size": "Checkpoint {what} block at byte {offset} has {actual} bytes, expected {expected}",
    "checkpoint_trailing_bytes": "Unexpected trailing bytes after byte {offset}",
    "checkpoint_layout_mismatch": "Parameter {name} has shape {actual}, network expects {expected}",
    "checkpoint_saved": "Checkpoint saved: {path} (epoch {epoch}, {size} bytes)",
    "checkpoint_loaded": "Checkpoint loaded: {path} (epoch {epoch}, {params} parameters)",

    # --- Sampling ---
    "sampler_unknown_method": "Unknown sampler {method}, choose from {choices}",
    "sampler_bad_stride": "Stride must be at least 1, got {stride}",
    "sampler_stride_ddim_only": "Step skipping is only supported by ddim, not {method}",
    "sampler_bad_zeta": "Sampler noise schedule must be finite and non-negative",
    "sampler_bad_zeta_ratio": "Noise ratio must lie in [0, 1], got {ratio}",
    "sampler_zeta_missing": "Sampler noise schedule has {size} entries, step {k} is missing",
    "sampler_zeta_too_large": "Sampler noise {zeta_sq} at step {k} exceeds the limit {limit}",
    "sampler_bad_prev_step": "Previous step {k_prev} must lie below step {k}",
    "sampler_no_start": "Give either a noise level or a start step",
    "sampler_start_unreachable": "Start step {k} exceeds the schedule length {steps} (maximum level {maximum})",
    "sampler_denoise_start": "Reverse process: {method} from step {k} (stride {stride})",
    "denoise_start": "Denoising {count} image(s) with {method} from step {k}",
    "denoise_done": "Denoised {count} image(s)",
    "benchmark_row": "level {level} {method}: PSNR {psnr:.3f} dB SSIM {ssim:.4f}",
    "benchmark_done": "Benchmark finished with {rows} row(s)",

    # --- Metrics ---
    "metrics_shape_mismatch": "Image shapes differ: {left} vs {right}",
    "metrics_image_too_small": "Image {shape} is smaller than the {window}x{window} window",
    "eval_unmatched_names": "Images without a counterpart: {names}",
    "eval_done": "Evaluated {count} image(s): mean PSNR {psnr:.3f} dB, mean SSIM {ssim:.4f}",

    # --- Verify ---
    "verify_unknown_fault": "Unknown fault {fault}, choose from {choices}",
    "verify_property": "[{status}] {name}: measured {measured:.4g} threshold {threshold:.4g}",
    "verify_passed": "All {count} properties passed",
    "verify_failed": "Property {name} failed: measured {measured:.4g} threshold {threshold:.4g} ({count} failure(s))",
}
