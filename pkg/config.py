class GlobalConfig:
    """
    用途说明：系统全局静态配置类，统一管理版本号、环境变量前缀及检查点格式常量。
    """
    APP_VERSION: str = '1.0.0'
    # 环境变量覆盖前缀，形如 GBMD_RUNTIME__SEED=7
    ENV_PREFIX: str = 'GBMD_'
    # 检查点文件魔数与当前格式版本
    CHECKPOINT_MAGIC: bytes = b'GBMD'
    CHECKPOINT_VERSION: int = 1
    # 两图完全一致时 PSNR 的封顶值 (dB)
    PSNR_CAP_DB: float = 100.0
