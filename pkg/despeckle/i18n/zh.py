TRANSLATIONS = {
    # --- 通用 ---
    "operation_success": "操作成功",
    "internal_error": "内部错误：{error}",
    "sys_unhandled_exception": "命令 {command} 出现未处理的异常：{stack}",

    # --- 命令行 ---
    "cli_command_start": "执行命令：{command}",
    "cli_command_failed": "命令失败 [{category}]：{message}",
    "cli_missing_argument": "命令 {command} 缺少必需参数 {flag}",
    "cli_input_not_found": "输入路径不存在：{path}",
    "cli_manifest_written": "已写出运行清单：{path}",

    # --- 配置 ---
    "config_bad_value": "配置项 {key} 的值无效：{value}",
    "config_file_not_found": "配置文件不存在：{path}",
    "config_file_loaded": "已加载配置文件：{path}",
    "config_line_malformed": "{path} 第 {line} 行格式错误，应为 key=value",
    "config_unknown_key": "忽略未知配置项 {key}（来源 {source}）",

    # --- 工具 ---
    "utils_dir_not_found": "目录不存在：{path}",
    "utils_file_not_found_md5": "无法计算 MD5，文件不存在：{path}",

    # --- 噪声日程 ---
    "schedule_bad_steps": "步数至少为 1，实际为 {steps}",
    "schedule_bad_eta_per_step": "每步方差增量须为正的有限数，实际为 {value}",
    "schedule_bad_sigma_range": "增量范围无效 [{low}, {high}]",
    "schedule_too_short": "日程至少需要两个元素",
    "schedule_eta0_nonzero": "日程须从零方差开始，实际为 {value}",
    "schedule_not_increasing": "日程必须严格递增",
    "schedule_step_out_of_range": "步 {k} 不在 [{lower}, {upper}] 内",
    "schedule_bad_level": "噪声水平须为非负有限数，实际为 {level}",
    "schedule_level_unreachable": "噪声水平 {level} 超出日程最大值 {maximum}",

    # --- 图像 ---
    "image_bad_shape": "图像形状须为 [C, H, W]，实际为 {shape}",
    "image_not_positive": "强度图须为有限且严格为正的值",
    "image_above_one": "强度图的值不能大于 1",
    "log_image_not_finite": "对数域图像须为有限值",
    "raw_image_bad_dims": "原始图像尺寸无效 {width}x{height}x{channels}",
    "raw_image_sample_count": "原始图像应有 {expected} 个采样值，实际为 {actual}",

    # --- 前向过程 ---
    "forward_noise_shape": "噪声形状应为 {expected}，实际为 {actual}",
    "corrupt_start": "在第 {k} 步（eta={eta}）为 {count} 张图像加噪",
    "corrupt_done": "已加噪 {count} 张图像",

    # --- 分数函数 ---
    "score_delta_degenerate": "第 {k} 步核方差为零，分数无定义",
    "score_gaussian_degenerate": "第 {k} 步总方差为零，分数无定义",
    "score_negative_variance": "先验方差不能为负",
    "score_shape_mismatch": "形状不一致：{left} 与 {right}",

    # --- 神经网络 ---
    "nn_shape_mismatch": "运算 {primitive} 收到不兼容的形状 {shapes}",
    "nn_backward_not_scalar": "backward() 需要标量输出，实际形状为 {shape}",
    "nn_grad_shape": "{name} 的梯度形状应为 {expected}，实际为 {actual}",
    "nn_embedding_odd_dim": "嵌入维度须为正偶数，实际为 {dim}",
    "nn_embedding_negative_step": "步序号不能为负，实际为 {k}",
    "nn_bad_widths": "网络宽度须为正数，实际为 {widths}",
    "nn_bad_hidden": "隐藏层宽度须为正数，实际为 {hidden}",
    "nn_unknown_kind": "未知的网络类型：{kind}",
    "nn_input_shape": "网络输入须为 [N, {channels}, H, W] 且 H、W 为 {multiple} 的倍数，实际为 {shape}",
    "nn_step_batch_mismatch": "批大小为 {batch}，却给出 {steps} 个步序号",
    "adam_count_mismatch": "优化器收到 {params} 个参数、{grads} 个梯度与 {moments} 个矩估计",
    "adam_shape_mismatch": "优化器第 {index} 项（{name}）形状不一致：应为 {expected}，实际为 {actual}",

    # --- 数据集 ---
    "dataset_empty_dir": "目录 {path} 中没有 PNM 图像",
    "dataset_all_skipped": "目录 {path} 中的图像全部被跳过",
    "dataset_loaded": "从 {path} 加载了 {count} 张图像（裁剪块 {patch}）",
    "dataset_skip_unreadable": "跳过无法读取的图像 {path}：{error}",
    "dataset_skip_small": "跳过 {path}：尺寸小于 {size}x{size}",
    "dataset_skip_channels": "跳过 {path}：通道数 {channels}，应为 {expected}",

    # --- PNM ---
    "pnm_bad_magic": "不支持的 PNM 魔数 {magic}，应为 P5 或 P6",
    "pnm_expected_number": "第 {offset} 字节处应为 {what}",
    "pnm_bad_dims": "第 {offset} 字节处尺寸无效 {width}x{height}",
    "pnm_bad_maxval": "第 {offset} 字节处 maxval 无效：{maxval}",
    "pnm_unsupported_maxval": "仅支持 8 位图像（maxval 255），实际为 {maxval}",
    "pnm_missing_separator": "第 {offset} 字节处头部后缺少空白分隔符",
    "pnm_truncated": "像素数据在第 {offset} 字节处截断：应有 {expected} 字节，实际 {actual}",

    # --- 训练 ---
    "train_bad_counts": "训练计数无效：epochs={epochs} batch={batch} steps={steps} interval={interval}",
    "train_bad_lr": "学习率无效 {lr}（最终值 {lr_final}）",
    "train_bad_patch": "裁剪块大小须为正数，实际为 {patch}",
    "train_patch_network_mismatch": "裁剪块大小 {patch} 须为 {multiple} 的倍数",
    "train_empty_dataset": "训练数据集为空",
    "train_non_finite_loss": "第 {step} 步损失出现非有限值（扩散步 {k}）",
    "train_zero_step_in_batch": "训练步序号至少为 1",
    "train_start": "开始训练 {kind} 网络（{params} 个参数），共 {epochs} 轮，每轮 {steps_per_epoch} 步",
    "train_epoch_done": "第 {epoch}/{epochs} 轮 平均损失 {loss:.6g} 学习率 {lr:.3g}",
    "train_done": "训练完成，检查点已保存至 {path}",
    "inspect_done": "已读取检查点头部：{path}",

    # --- 检查点 ---
    "checkpoint_truncated": "读取 {what} 时检查点在第 {offset} 字节处截断",
    "checkpoint_bad_magic": "不是检查点文件（第 {offset} 字节魔数错误）",
    "checkpoint_not_found": "检查点文件不存在: {path}",
    "checkpoint_unsupported_version": "不支持的检查点版本 {version}，当前可读取版本 {supported}",
    "checkpoint_bad_field": "检查点字段 {field} 在第 {offset} 字节处不是合法 UTF-8",
    "checkpoint_missing_field": "检查点头部缺少 {field}（第 {offset} 字节）",
    "checkpoint_bad_header": "检查点头部在第 {offset} 字节处无效：{error}",
    "checkpoint_blob_size": "第 {offset} 字节处的 {what} 数据块为 {actual} 字节，应为 {expected}",
    "checkpoint_trailing_bytes": "第 {offset} 字节之后有多余数据",
    "checkpoint_layout_mismatch": "参数 {name} 形状为 {actual}，网络需要 {expected}",
    "checkpoint_saved": "检查点已保存：{path}（第 {epoch} 轮，{size} 字节）",
    "checkpoint_loaded": "检查点已加载：{path}（第 {epoch} 轮，{params} 个参数）",

    # --- 采样 ---
    "sampler_unknown_method": "未知的采样方法 {method}，可选 {choices}",
    "sampler_bad_stride": "跳步步长至少为 1，实际为 {stride}",
    "sampler_stride_ddim_only": "只有 ddim 支持跳步，{method} 不支持",
    "sampler_bad_zeta": "采样噪声序列须为有限非负值",
    "sampler_bad_zeta_ratio": "噪声比例须在 [0, 1] 内，实际为 {ratio}",
    "sampler_zeta_missing": "采样噪声序列只有 {size} 项，缺少第 {k} 步",
    "sampler_zeta_too_large": "第 {k} 步采样噪声 {zeta_sq} 超过上限 {limit}",
    "sampler_bad_prev_step": "前一步 {k_prev} 须小于当前步 {k}",
    "sampler_no_start": "须给出噪声水平或起始步其中之一",
    "sampler_start_unreachable": "起始步 {k} 超出日程长度 {steps}（最大水平 {maximum}）",
    "sampler_denoise_start": "反向过程：{method} 从第 {k} 步开始（步长 {stride}）",
    "denoise_start": "使用 {method} 从第 {k} 步开始为 {count} 张图像去噪",
    "denoise_done": "已去噪 {count} 张图像",
    "benchmark_row": "水平 {level} {method}：PSNR {psnr:.3f} dB SSIM {ssim:.4f}",
    "benchmark_done": "对比实验完成，共 {rows} 行",

    # --- 指标 ---
    "metrics_shape_mismatch": "图像形状不一致：{left} 与 {right}",
    "metrics_image_too_small": "图像 {shape} 小于 {window}x{window} 窗口",
    "eval_unmatched_names": "以下图像没有对应项：{names}",
    "eval_done": "已评估 {count} 张图像：平均 PSNR {psnr:.3f} dB，平均 SSIM {ssim:.4f}",

    # --- 自检 ---
    "verify_unknown_fault": "未知的故障类型 {fault}，可选 {choices}",
    "verify_property": "[{status}] {name}：测量值 {measured:.4g} 阈值 {threshold:.4g}",
    "verify_passed": "全部 {count} 项属性通过",
    "verify_failed": "属性 {name} 未通过：测量值 {measured:.4g} 阈值 {threshold:.4g}（共 {count} 项失败）",
}
